int count_digits(int x) {
    int c;
    c = 0;
    while (x > 0) {
        x = x / 10;
        c++;
    }
    return c;
}

int sum_digits(int x) {
    int s;
    s = 0;
    while (x > 0) {
        s = s + x % 10;
        x = x / 10;
    }
    return s;
}

int main() {
    int n;
    scanf("%d", &n);
    printf("%d\n%d\n", count_digits(n), sum_digits(n));
    return 0;
}
