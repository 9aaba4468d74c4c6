package orders;

public interface Item {
    double price();

    int quantity();

    double mass();

    int count();
}
