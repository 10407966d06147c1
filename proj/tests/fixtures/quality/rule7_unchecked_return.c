int store(int *slot, int value)
{
    *slot = value;
    return 1;
}

void reset(int *slot)
{
    store(slot, 0);
}
