double sum = 0;
for (Item item : items) {
    sum += item.price() * item.quantity();
}
