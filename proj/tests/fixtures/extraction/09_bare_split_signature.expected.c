void
Brak_10ms(void)
{
    rtdb_truck.val = TRUE;
}
