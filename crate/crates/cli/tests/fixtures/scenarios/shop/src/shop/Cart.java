package shop;

import java.util.List;

public class Cart {
    public int total(List<Integer> prices) {
        int sum = 0;
        for (int p : prices) {
            sum += p;
        }
        return sum;
    }

    public double average(List<Integer> prices) {
        int sum = 0;
        for (int p : prices) {
            sum += p;
        }
        return (double) sum / prices.size();
    }
}
