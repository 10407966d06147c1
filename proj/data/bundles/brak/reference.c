void Brak_10ms(void)
{
    tBS req;

    if (rtdb_state.ss_U08 == SS_GOOD) {
        gh_operationalState = rtdb_state.val;
    } else {
        gh_operationalState = OPSTATE_OFF;
    }
    if (rtdb_voltage.ss_U08 == SS_GOOD) {
        gh_supplyVoltageLevel = rtdb_voltage.val;
    } else {
        gh_supplyVoltageLevel = VOLTAGE_LOW;
    }
    validateInputBool(&rtdb_req, &req, FALSE, FALSE);
    if ((req.val == TRUE) && (gh_operationalState == OPSTATE_RUNNING) &&
        (gh_supplyVoltageLevel != VOLTAGE_LOW)) {
        gh_brakeLightEnabled = TRUE;
    } else {
        gh_brakeLightEnabled = FALSE;
    }
    rtdb_truck.val = gh_brakeLightEnabled;
    rtdb_truck.ss_U08 = SS_GOOD;
    rtdb_trailer.val = gh_brakeLightEnabled;
    rtdb_trailer.ss_U08 = SS_GOOD;
}
