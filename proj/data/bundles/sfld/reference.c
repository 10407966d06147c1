void Sfld_10ms(void)
{
    tBS fluidLow;
    tBS engineRunning;

    validateInputBool(&rtdb_fluidLow, &fluidLow, FALSE, FALSE);
    validateInputBool(&rtdb_engineRunning, &engineRunning, FALSE, FALSE);
    if ((engineRunning.val == TRUE) && (fluidLow.val == TRUE)) {
        if (gh_lowCounter < LOW_DEBOUNCE_LIMIT) {
            gh_lowCounter = (tU08)(gh_lowCounter + 1U);
        }
    } else {
        gh_lowCounter = 0U;
    }
    if (gh_lowCounter == LOW_DEBOUNCE_LIMIT) {
        gh_fluidLevelLow = TRUE;
    } else {
        gh_fluidLevelLow = FALSE;
    }
    rtdb_fluidWarning.val = gh_fluidLevelLow;
    rtdb_fluidWarning.ss_U08 = SS_GOOD;
}
