int mix(int a, int b)
{
    int c = a; /* opens here
                  and closes here */
    c = c + b;
    /**/
    return c;
}
