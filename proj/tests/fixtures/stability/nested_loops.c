int pairs(int n) {
    int c = 0;
    for (int i = 0; i < n; i++) {
        for (int j = i; j < n; j++) {
            c++;
        }
        /* @insert */
    }
    return c;
}
