public class Index26 {
    private int[] entries;
    private int top;

    public Index26(int capacity) {
        entries = new int[capacity];
        top = -1;
    }

    public void push(int value) {
        if (top + 1 == entries.length) {
            throw new IllegalStateException("full");
        }
        entries[++top] = value;
    }

    public int pop() {
        if (top < 0) {
            throw new IllegalStateException("empty");
        }
        return entries[top--];
    }

    public boolean isEmpty() {
        return top < 0;
    }
}
