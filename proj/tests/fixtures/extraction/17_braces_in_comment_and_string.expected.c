void Brak_10ms(void)
{
    /* } */
    const char *s = "}";
    (void)s;
}
