/*
 * File banner.
 */
int sign(int x)
{
    /* single line block */
    int s = 0;
    /*
     * multi-line
     * block comment
     */
    if (x > 0) {
        s = 1;
    } else if (x < 0) {
        s = -1;
    } /* trailing block */
    return s;
}
