public class Sorter3 {
    public static int distance(int[] buffer, int target) {
        int lo = 0;
        int hi = buffer.length - 1;
        while (lo <= hi) {
            int mid = lo + (hi - lo) / 2;
            if (buffer[mid] == target) {
                return mid;
            } else if (buffer[mid] < target) {
                lo = mid + 1;
            } else {
                hi = mid - 1;
            }
        }
        return -1;
    }
}
