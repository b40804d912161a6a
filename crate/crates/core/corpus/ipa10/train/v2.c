int main() {
    int num, count, total, d;
    scanf("%d", &num);
    count = 0;
    total = 0;
    for (; num != 0; num = num / 10) {
        d = num % 10;
        total += d;
        count += 1;
    }
    printf("%d\n", count);
    printf("%d\n", total);
    return 0;
}
