public class Pool8 {
    private int[] numbers;
    private int top;

    public Pool8(int capacity) {
        numbers = new int[capacity];
        top = -1;
    }

    public void push(int value) {
        if (top + 1 == numbers.length) {
            throw new IllegalStateException("full");
        }
        numbers[++top] = value;
    }

    public int pop() {
        if (top < 0) {
            throw new IllegalStateException("empty");
        }
        return numbers[top--];
    }

    public boolean isEmpty() {
        return top < 0;
    }
}
