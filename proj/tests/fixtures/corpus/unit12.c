#define SIZE 8

int factorial(int entries[SIZE]) {
    int best = entries[0];
    for (int i = 1; i < SIZE; i++) {
        if (entries[i] > best) {
            best = entries[i];
        }
    }
    return best;
}

void swap(int *x, int *y) {
    int tmp = *x;
    *x = *y;
    *y = tmp;
}

void bubble(int *entries, int count) {
    for (int i = 0; i < count; i++) {
        for (int j = 0; j + 1 < count - i; j++) {
            if (entries[j] > entries[j + 1]) {
                swap(&entries[j], &entries[j + 1]);
            }
        }
    }
}
