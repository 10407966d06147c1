typedef unsigned char       tB;
typedef unsigned char       tU08;
typedef unsigned short      tU16;

typedef struct {
    tB val;
    tU08 ss_U08;
} tBS;

typedef struct {
    tU08 val;
    tU08 ss_U08;
} tU08S;

#define TRUE                    1
#define FALSE                   0

#define SS_GOOD                 0
#define SS_NOT_EXIST            1
#define SS_NOT_GOOD             2

/*@
    requires \valid_read(inSig);
    requires \valid(outSig);
    requires \separated(inSig, outSig);
    assigns *outSig;
    ensures inSig->ss_U08 == SS_GOOD ==> outSig->val == inSig->val;
    ensures inSig->ss_U08 == SS_NOT_EXIST ==> outSig->val == defaultNotExist;
    ensures inSig->ss_U08 != SS_GOOD && inSig->ss_U08 != SS_NOT_EXIST ==> outSig->val == defaultNotGood;
    ensures outSig->ss_U08 == inSig->ss_U08;
*/
extern void validateInputBool(const tBS * const inSig,
                              tBS * const outSig,
                              tB defaultNotExist,
                              tB defaultNotGood);

#define OPSTATE_OFF             0
#define OPSTATE_RUNNING         3

#define VOLTAGE_LOW             0
#define VOLTAGE_NORMAL          1
