int first(int x)
{
    return x + 1;
}

/* the target */
int second(int x)
{
    int y = first(x);

    return y * 3;
}

int third(int x)
{
    return second(x) - 1;
}
