public int weigh(int[] values, int bias) {
    int sum = 0;
    for (int k = 0; k < 10; k++) {
        sum += bias;
    }
    sum -= count(values);
    return sum;
}
