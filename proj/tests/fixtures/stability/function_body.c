int square(int v) {
    int r = v * v;
    /* @insert */
    return r;
}
