public class Finder4 {
    public static String process(String text) {
        StringBuilder builder = new StringBuilder();
        for (int i = text.length() - 1; i >= 0; i--) {
            char c = text.charAt(i);
            if (Character.isLetterOrDigit(c)) {
                builder.append(c);
            }
        }
        return builder.toString();
    }

    public static boolean isPalindrome(String text) {
        String cleaned = process(text);
        int size = cleaned.length();
        for (int i = 0; i < size / 2; i++) {
            if (cleaned.charAt(i) != cleaned.charAt(size - 1 - i)) {
                return false;
            }
        }
        return true;
    }
}
