const char *label(int code)
{
    const char *text = "/* not a comment */";

    if (code == 1) {
        text = "// still not a comment";
    }
    return text;
}
