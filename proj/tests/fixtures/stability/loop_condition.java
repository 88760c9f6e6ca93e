class I {
    int merge(int[] a, int[] b) {
        int i = 0, j = 0;
        while (i < a.length && j < b.length) {
            /* @insert */
            i++;
            j++;
        }
        return i + j;
    }
}
