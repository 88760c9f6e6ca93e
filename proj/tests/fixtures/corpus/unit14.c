unsigned long process(unsigned int size) {
    unsigned long result = 1;
    while (size > 1) {
        result *= size;
        size--;
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

int items(int a, int b) {
    /* least common multiple */
    return a / gcd(a, b) * b;
}
