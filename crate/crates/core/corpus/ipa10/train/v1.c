int main() {
    int n, digits, sum;
    scanf("%d", &n);
    digits = 0;
    sum = 0;
    while (n > 0) {
        sum = sum + n % 10;
        n = n / 10;
        digits++;
    }
    printf("%d\n%d\n", digits, sum);
    return 0;
}
