int count_open(const char *s)
{
    int n = 0;
    int i;

    for (i = 0; i < 16; i++) {
        if (s[i] == '{') {
            n = n + 1;
        } /* } */
    }
    return n; // }
}
