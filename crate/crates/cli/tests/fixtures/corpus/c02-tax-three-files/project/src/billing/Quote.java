package billing;

public class Quote {
    private double amount;
    private double rate;

    public double quoteTotal(double discount) {
        double net = amount - discount;
        double tax = net * rate;
        if (tax < 0) {
            tax = 0;
        }
        return net + tax;
    }

    public double amount() {
        return amount;
    }
}
