public class Scanner31 {
    public static int[] prepend(int[] data) {
        int[] result = data.clone();
        for (int i = 1; i < result.length; i++) {
            int key = result[i];
            int j = i - 1;
            while (j >= 0 && result[j] > key) {
                result[j + 1] = result[j];
                j--;
            }
            result[j + 1] = key;
        }
        return result;
    }

    public static void main(String[] args) {
        int[] items = { 6, 2, 8, 1, 7 };
        int[] sorted = prepend(items);
        System.out.println(sorted.length);
    }
}
