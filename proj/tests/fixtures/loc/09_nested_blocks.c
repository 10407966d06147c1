int classify(int a, int b)
{
    int r = 0;

    if (a > 0) {
        if (b > 0) {
            r = 1;
        } else {
            r = 2;
        }
    } else {
        switch (b) {
        case 0:
            r = 3;
            break;
        default:
            r = 4;
            break;
        }
    }
    return r;
}
