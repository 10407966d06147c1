// leading comment
int twice(int x)   // trailing comment
{
    // whole-line comment
    int y = x * 2; // explained
    //
    return y;
}
