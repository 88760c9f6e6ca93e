class F {
    int twice(int v) {
        /* @insert */
        return v * 2;
    }
}
