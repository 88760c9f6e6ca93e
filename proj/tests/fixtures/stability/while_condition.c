int merge(const int *a, int na, const int *b, int nb) {
    int i = 0, j = 0;
    while (i < na && j < nb) {
        /* @insert */
        if (a[i] < b[j]) i++; else j++;
    }
    return i + j;
}
