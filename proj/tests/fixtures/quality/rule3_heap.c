#include <stdlib.h>

int *make_buffer(unsigned count)
{
    int *buffer = malloc(count * sizeof(int));

    return buffer;
}
