void Stee_10ms(void)
{
    tBS enable;

    validateInputBool(&rtdb_enable, &enable, FALSE, FALSE);
    if (enable.val != TRUE) {
        gh_assistLevel = ASSIST_NONE;
    } else if (rtdb_speed.ss_U08 != SS_GOOD) {
        gh_assistLevel = ASSIST_LOW;
    } else if (rtdb_speed.val < SPEED_LOW_LIMIT) {
        gh_assistLevel = ASSIST_HIGH;
    } else {
        gh_assistLevel = ASSIST_LOW;
    }
    rtdb_assist.val = gh_assistLevel;
    rtdb_assist.ss_U08 = SS_GOOD;
}
