//Input variables
static tU08S rtdb_state;
static tU08S rtdb_voltage;
static tBS rtdb_req;

//Output variables
static tBS rtdb_truck;
static tBS rtdb_trailer;

//Concrete variables
tU08 gh_operationalState;
tU08 gh_supplyVoltageLevel;
tU08 gh_brakeLightEnabled;
