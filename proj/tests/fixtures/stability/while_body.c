int drain(int n) {
    while (n > 0) {
        /* @insert */
        n--;
    }
    return n;
}
