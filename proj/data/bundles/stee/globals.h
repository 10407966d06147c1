//Input variables
static tBS rtdb_enable;
static tU08S rtdb_speed;

//Output variables
static tU08S rtdb_assist;

//Concrete variables
tU08 gh_assistLevel;
