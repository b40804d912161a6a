int main() {
    int num, c;
    scanf("%d", &num);
    c = 1;
    while (c <= num) {
        printf("%d\n", c);
        c++;
    }
    return 0;
}
