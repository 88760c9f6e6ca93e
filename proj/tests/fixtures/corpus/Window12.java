import java.util.ArrayList;
import java.util.List;

public class Window12 {
    private final List<Integer> numbers = new ArrayList<>();
    private int size;

    public Window12(int size) {
        this.size = size;
    }

    public boolean add(int value) {
        if (numbers.size() >= size) {
            return false;
        }
        numbers.add(value);
        return true;
    }

    public int sum() {
        int total = 0;
        for (int i = 0; i < numbers.size(); i++) {
            total += numbers.get(i);
        }
        return total;
    }
}
