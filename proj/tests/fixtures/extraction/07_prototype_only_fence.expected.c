void Brak_10ms(void);
