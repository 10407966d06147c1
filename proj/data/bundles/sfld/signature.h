void Sfld_10ms(void);
