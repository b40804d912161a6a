int main() {
    int first, second, tmp;
    scanf("%d %d", &first, &second);
    if (first > second) {
        tmp = first;
        first = second;
        second = tmp;
    }
    printf("%d\n%d\n", first, second);
    return 0;
}
