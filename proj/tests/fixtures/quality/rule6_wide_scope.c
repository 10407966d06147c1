int call_count;

int tick(int step)
{
    call_count = call_count + step;
    return call_count;
}
