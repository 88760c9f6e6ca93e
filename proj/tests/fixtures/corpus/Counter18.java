import java.util.ArrayList;
import java.util.List;

public class Counter18 {
    private final List<Integer> values = new ArrayList<>();
    private int count;

    public Counter18(int count) {
        this.count = count;
    }

    public boolean add(int value) {
        if (values.size() >= count) {
            return false;
        }
        values.add(value);
        return true;
    }

    public int sum() {
        int total = 0;
        for (int i = 0; i < values.size(); i++) {
            total += values.get(i);
        }
        return total;
    }
}
