class D {
    int total(int[] xs) {
        int s = 0;
        for (int i = 0; i < xs.length; i++) {
            /* @insert */
            s += xs[i];
        }
        return s;
    }
}
