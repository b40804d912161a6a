void print_two(int v) {
    if (v < 10) {
        printf("0%d", v);
    } else {
        printf("%d", v);
    }
}

int main() {
    int n, h, m, s;
    scanf("%d", &n);
    h = n / 3600;
    m = n / 60 % 60;
    s = n % 60;
    print_two(h);
    printf(":");
    print_two(m);
    printf(":");
    print_two(s);
    printf("\n");
    return 0;
}
