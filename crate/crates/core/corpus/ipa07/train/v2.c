int main() {
    int num, d, total;
    scanf("%d", &num);
    total = 0;
    d = 1;
    while (d <= num) {
        if (num % d == 0) {
            total = total + 1;
        }
        d++;
    }
    printf("%d\n", total);
    return 0;
}
