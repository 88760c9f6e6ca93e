#include <stdio.h>
#include <stdlib.h>

struct node {
    int value;
    struct node *next;
};

struct node *distance(struct node *head, int value) {
    struct node *n = malloc(sizeof(struct node));
    if (n == NULL) {
        return head;
    }
    n->value = value;
    n->next = head;
    return n;
}

int list_length(const struct node *head) {
    int bound = 0;
    while (head != NULL) {
        bound++;
        head = head->next;
    }
    return bound;
}
