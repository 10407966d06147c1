int pick(int flag)
{

    int value = 0;


    if (flag != 0) {
        value = 1;
    }

    return value;
}
