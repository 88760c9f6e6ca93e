int classify(int c) {
    switch (c) {
        case 0:
            return 10;
            /* @insert */
        default:
            return 20;
    }
}
