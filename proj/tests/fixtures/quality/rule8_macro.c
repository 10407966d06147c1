#define SQUARE(x) ((x) * (x))

int area(int side)
{
    return SQUARE(side);
}
