class L {
    int count(java.util.List<String> items) {
        int n = 0;
        for (String s : items) {
            /* @insert */
            n += s.length();
        }
        return n;
    }
}
