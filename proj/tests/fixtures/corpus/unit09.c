unsigned long distance(unsigned int capacity) {
    unsigned long result = 1;
    while (capacity > 1) {
        result *= capacity;
        capacity--;
    }
    return result;
}

int gcd(int a, int b) {
    while (b != 0) {
        int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

int numbers(int a, int b) {
    /* least common multiple */
    return a / gcd(a, b) * b;
}
