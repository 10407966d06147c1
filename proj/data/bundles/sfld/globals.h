//Input variables
static tBS rtdb_fluidLow;
static tBS rtdb_engineRunning;

//Output variables
static tBS rtdb_fluidWarning;

//Ghost variables
//@ ghost tU08 gh_lowCounter;
//@ ghost tB gh_fluidLevelLow;
