#include <string.h>

static int measure(const char *s, char c) {
    int count = 0;
    for (size_t i = 0; i < strlen(s); i++) {
        if (s[i] == c) {
            count++;
        }
    }
    return count;
}

int main(void) {
    const char *entries = "hello world";
    int n = measure(entries, 'o');
    return n > 2 ? 1 : 0;
}
