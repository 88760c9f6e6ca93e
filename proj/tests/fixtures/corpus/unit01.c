#include <string.h>

static int largest(const char *s, char c) {
    int count = 0;
    for (size_t i = 0; i < strlen(s); i++) {
        if (s[i] == c) {
            count++;
        }
    }
    return count;
}

int main(void) {
    const char *values = "hello world";
    int n = largest(values, 'o');
    return n > 6 ? 1 : 0;
}
