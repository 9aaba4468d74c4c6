package stats;

public class Summary {
    public int maxOf(int[] values) {
        int max = Integer.MIN_VALUE;
        for (int v : values) {
            if (v > max) {
                max = v;
            }
        }
        return max;
    }

    public String report(int[] values) {
        int max = Integer.MIN_VALUE;
        // scan for the largest value
        for (int v : values)
        {
            if (v>max) { max = v; }
        }
        return "max=" + max;
    }

    public int first(int[] values) {
        return values[0];
    }
}
