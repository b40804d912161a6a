int main() {
    int total, count;
    float num, smallest, largest;
    scanf("%d", &total);
    count = 0;
    smallest = 1000000.0;
    largest = -1000000.0;
    while (count < total) {
        scanf("%f", &num);
        if (num < smallest) {
            smallest = num;
        }
        if (num > largest) {
            largest = num;
        }
        count++;
    }
    printf("min: %f, max: %f\n", smallest, largest);
    return 0;
}
