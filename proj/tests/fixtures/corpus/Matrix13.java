public class Matrix13 {
    public static int[] reverse(int[] data) {
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
        int[] items = { 5, 7, 7, 1, 7 };
        int[] sorted = reverse(items);
        System.out.println(sorted.length);
    }
}
