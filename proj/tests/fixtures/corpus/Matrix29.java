public class Matrix29 {
    private long data = 0;

    public synchronized void increment(int count) {
        for (int i = 0; i < count; i++) {
            data += i % 9;
        }
    }

    public long value() {
        return data;
    }

    @Override
    public String toString() {
        return "Matrix29(" + data + ")";
    }
}
