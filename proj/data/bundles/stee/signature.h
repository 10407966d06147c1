void Stee_10ms(void);
